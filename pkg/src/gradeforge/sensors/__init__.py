from .camera import (
    DEFAULT_HFOV_DEG,
    DEFAULT_VFOV_DEG,
    FORWARD_MOUNT,
    CameraIntrinsics,
    DepthImage,
    InstanceImage,
    SceneSnapshot,
    best_view_yaw,
    build_snapshot,
    default_camera_pair,
    raycast_camera,
)
from .imu import GRAVITY, ImuSample, ImuStream, imu_ground_truth, imu_stream_from_poses
from .images import (
    instance_hue,
    load_depth_png,
    load_instance_png,
    load_pfm,
    load_rgb_png,
    proxy_rgb,
    save_depth_png,
    save_instance_png,
    save_pfm,
    save_rgb_png,
)
from .boxes import InstanceBoxes, bounding_boxes, load_boxes_jsonl, save_boxes_jsonl

__all__ = [
    "DEFAULT_HFOV_DEG",
    "DEFAULT_VFOV_DEG",
    "FORWARD_MOUNT",
    "CameraIntrinsics",
    "DepthImage",
    "InstanceImage",
    "SceneSnapshot",
    "best_view_yaw",
    "build_snapshot",
    "default_camera_pair",
    "raycast_camera",
    "GRAVITY",
    "ImuSample",
    "ImuStream",
    "imu_ground_truth",
    "imu_stream_from_poses",
    "instance_hue",
    "load_depth_png",
    "load_instance_png",
    "load_pfm",
    "load_rgb_png",
    "proxy_rgb",
    "save_depth_png",
    "save_instance_png",
    "save_pfm",
    "save_rgb_png",
    "InstanceBoxes",
    "bounding_boxes",
    "load_boxes_jsonl",
    "save_boxes_jsonl",
]
