"""Desk-scale dynamic-scene simulator with deterministic sensor recording.

The package is organised as a stack of small libraries:

* ``geometry``  triangle meshes, BVH acceleration, contact counting,
  footprint and occupancy extraction
* ``scene``     animation tracks, asset proxies, collision-aware placement
* ``robot``     joint-limited 6-DOF model, PID setpoint tracking, waypoints
* ``sim``       fixed-step engine, multi-rate channel recording, replay
* ``sensors``   pinhole ray casting, IMU ground truth, instance/depth images
* ``noise``     post-processing corruptions applied to recorded logs
* ``evaluation`` trajectory alignment, error metrics, sequence statistics

The command line front end lives in :mod:`gradeforge.cli`.
"""

__version__ = "0.1.0"
