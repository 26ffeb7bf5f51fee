from .mesh import TriMesh, SEMANTIC_LABELS
from .bvh import Bvh, build_bvh
from .intersect import count_contacts
from .footprint import FootprintPolygon, OccupancyGrid, extract_footprint, rasterize_occupancy

__all__ = [
    "TriMesh",
    "SEMANTIC_LABELS",
    "Bvh",
    "build_bvh",
    "count_contacts",
    "FootprintPolygon",
    "OccupancyGrid",
    "extract_footprint",
    "rasterize_occupancy",
]
