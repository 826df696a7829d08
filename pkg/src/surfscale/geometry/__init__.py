'''Geometric core: points, surfaces, regions, polygon arithmetic.'''

from .polygon import (FREE_EDGE, bisector_halfplane, box_polygon, clip_convex,
                      clip_halfplane, clip_segments_to_box, convex_polygon_planes,
                      equal_area_circumradius, order_around, points_in_convex,
                      polygon_area, polygon_centroid, polygon_perimeter,
                      rect_polygon, regular_polygon)
from .regions import (BallRegion, ConvexPolygonRegion, GraphSubRegion,
                      HalfPlaneRegion, Region, RegularPolygonRegion, SimplexRegion3)
from .surfaces import (EPS_SURF, MAX_ITER, FunctionGraph, Hyperplane, ImplicitSmooth,
                       PolygonalChain, Sphere, Surface, SurfaceParamPoint,
                       closest_point_param, surface_measure, tangent_hyperplane)

__all__ = [
    'FREE_EDGE', 'EPS_SURF', 'MAX_ITER',
    'bisector_halfplane', 'box_polygon', 'clip_convex', 'clip_halfplane',
    'clip_segments_to_box', 'convex_polygon_planes', 'equal_area_circumradius',
    'order_around', 'points_in_convex', 'polygon_area', 'polygon_centroid',
    'polygon_perimeter', 'rect_polygon', 'regular_polygon',
    'BallRegion', 'ConvexPolygonRegion', 'GraphSubRegion', 'HalfPlaneRegion',
    'Region', 'RegularPolygonRegion', 'SimplexRegion3',
    'FunctionGraph', 'Hyperplane', 'ImplicitSmooth', 'PolygonalChain', 'Sphere',
    'Surface', 'SurfaceParamPoint', 'closest_point_param', 'surface_measure',
    'tangent_hyperplane',
]
