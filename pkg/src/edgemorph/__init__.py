"""Edge-based structured morphology on pixel-adjacency graphs."""

from .classical import FlatSE, PixelSkeleton, dilate_px, erode_px, open_px, recon_px, skel_px
from .embed import Embedding, direct_neighborhood, embeddings_at, neighborhood, neighborhood_table
from .grid import (
    Connectivity,
    EdgeSet,
    GridGraph,
    build_grid,
    edgeset_to_image,
    image_to_edgeset,
)
from .morph import (
    ConnectedCheck,
    EdgeWeightMap,
    VacuousPolicy,
    check_connected_instance,
    close_adjoint,
    dilate,
    erode,
    gray_dilate,
    gray_erode,
    open_adjoint,
    open_structural,
)
from .sgraph import StructuringGraph, builtin, parse_sgraph, serialize_sgraph
from .skeleton import (
    INF,
    DistanceMap,
    DistanceVariant,
    SkeletonDecomposition,
    Termination,
    distance_map,
    local_maxima,
    reconstruct,
    skeleton_by_distance,
    skeletonize,
)

__version__ = "0.1.0"
