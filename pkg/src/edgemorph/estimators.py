"""scikit-learn compatible wrappers.

Each transformer takes a single 2-D binary image or a stack of shape
``(n_images, height, width)`` and returns the same layout.  Parameters
follow the usual ``get_params``/``set_params`` conventions, so the
transformers drop into ``Pipeline`` and ``clone``.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .grid import Connectivity, build_grid, edgeset_to_image, image_to_edgeset
from .morph import VacuousPolicy, close_adjoint, dilate, erode, open_adjoint, open_structural
from .sgraph import StructuringGraph, builtin
from .skeleton import DistanceVariant, distance_map, reconstruct, skeletonize

OPERATIONS = ("dilate", "erode", "open", "close", "open_structural")


def check_image_stack(X, *, allow_gray: bool = False, threshold: int = 128):
    """Validate ``X`` and return ``(stack, was_2d)``.

    ``stack`` is a boolean ``(n, h, w)`` array.  Non-boolean input must be
    0/1 unless ``allow_gray``, in which case values ``>= threshold`` are
    foreground.
    """
    arr = np.asarray(X)
    if arr.dtype == object:
        raise ValueError("image data must be numeric or boolean")
    if arr.ndim == 2:
        arr, was_2d = arr[None], True
    elif arr.ndim == 3:
        was_2d = False
    else:
        raise ValueError(f"expected a 2-D image or 3-D stack, got {arr.ndim} dimensions")
    if arr.shape[0] == 0 or arr.shape[1] == 0 or arr.shape[2] == 0:
        raise ValueError(f"empty image data of shape {arr.shape}")
    if arr.dtype == bool:
        return arr, was_2d
    if not np.issubdtype(arr.dtype, np.number):
        raise ValueError(f"unsupported dtype {arr.dtype}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image data contains NaN or infinity")
    if allow_gray:
        return arr >= threshold, was_2d
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("binary images must hold only 0 and 1")
    return arr.astype(bool), was_2d


def _resolve_sgraph(sgraph) -> StructuringGraph:
    if isinstance(sgraph, StructuringGraph):
        return sgraph
    return builtin(sgraph)


def _restore(stack, was_2d):
    return stack[0] if was_2d else stack


class _ImageTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        stack, was_2d = check_image_stack(X)
        self._validate_params()
        self.image_shape_ = stack.shape[1:]
        self.single_image_ = was_2d
        return self

    def _check_shape(self, stack):
        check_is_fitted(self, "image_shape_")
        if stack.shape[1:] != self.image_shape_:
            raise ValueError(
                f"fitted on images of shape {self.image_shape_}, got {stack.shape[1:]}"
            )

    def _grid(self, shape):
        return build_grid(shape[1], shape[0], Connectivity.coerce(self.connectivity))


class EdgeMorphology(_ImageTransformer):
    """Apply one edge-based operator to binary images.

    ``operation`` is one of ``dilate``, ``erode``, ``open``, ``close``
    (adjoint compositions) or ``open_structural``.
    """

    def __init__(self, operation="dilate", sgraph="grid3", connectivity=8, vacuous="include"):
        self.operation = operation
        self.sgraph = sgraph
        self.connectivity = connectivity
        self.vacuous = vacuous

    def _validate_params(self):
        if self.operation not in OPERATIONS:
            raise ValueError(f"operation must be one of {OPERATIONS}, got {self.operation!r}")
        _resolve_sgraph(self.sgraph)
        VacuousPolicy.coerce(self.vacuous)
        Connectivity.coerce(self.connectivity)

    def transform(self, X):
        stack, was_2d = check_image_stack(X)
        self._check_shape(stack)
        sg = _resolve_sgraph(self.sgraph)
        grid = self._grid(stack.shape[1:])
        policy = VacuousPolicy.coerce(self.vacuous)
        ops = {
            "dilate": lambda m: dilate(m, sg, grid),
            "erode": lambda m: erode(m, sg, grid, policy),
            "open": lambda m: open_adjoint(m, sg, grid, policy),
            "close": lambda m: close_adjoint(m, sg, grid, policy),
            "open_structural": lambda m: open_structural(m, sg, grid),
        }
        op = ops[self.operation]
        out = np.stack([edgeset_to_image(op(image_to_edgeset(img, grid))) for img in stack])
        return _restore(out, was_2d)


class GraphSkeleton(_ImageTransformer):
    """Multiscale edge skeleton.

    ``transform`` returns per-pixel scale labels (1 + smallest layer index,
    0 off the skeleton).  After ``fit``, ``decompositions_`` holds one
    decomposition per training image and :meth:`inverse_transform`
    rebuilds them at level ``k``.
    """

    def __init__(self, sgraph="grid3", connectivity=8, vacuous="include", max_iter=None, k=0):
        self.sgraph = sgraph
        self.connectivity = connectivity
        self.vacuous = vacuous
        self.max_iter = max_iter
        self.k = k

    def _validate_params(self):
        _resolve_sgraph(self.sgraph)
        VacuousPolicy.coerce(self.vacuous)
        Connectivity.coerce(self.connectivity)
        if self.max_iter is not None and self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.k < 0:
            raise ValueError("k must be non-negative")

    def _decompose(self, stack):
        sg = _resolve_sgraph(self.sgraph)
        grid = self._grid(stack.shape[1:])
        return [
            skeletonize(image_to_edgeset(img, grid), sg, grid, self.vacuous, self.max_iter)
            for img in stack
        ]

    def fit(self, X, y=None):
        super().fit(X, y)
        stack, _ = check_image_stack(X)
        self.decompositions_ = self._decompose(stack)
        return self

    def transform(self, X):
        stack, was_2d = check_image_stack(X)
        self._check_shape(stack)
        labels = np.stack([d.scale_labels() for d in self._decompose(stack)])
        return _restore(labels, was_2d)

    def inverse_transform(self, X=None):
        """Reconstruct the fitted images at level ``k`` (``X`` is ignored)."""
        check_is_fitted(self, "decompositions_")
        out = np.stack([edgeset_to_image(reconstruct(d, k=self.k)) for d in self.decompositions_])
        return _restore(out, self.single_image_)


class ErosionDistance(_ImageTransformer):
    """Erosion-count distance map with the odd or even triangle on the 8-connected grid."""

    def __init__(self, variant="odd", vacuous="exclude", max_iter=None):
        self.variant = variant
        self.vacuous = vacuous
        self.max_iter = max_iter

    def _grid(self, shape):
        return build_grid(shape[1], shape[0], Connectivity.EIGHT)

    def _validate_params(self):
        DistanceVariant.coerce(self.variant)
        VacuousPolicy.coerce(self.vacuous)

    def transform(self, X):
        stack, was_2d = check_image_stack(X)
        self._check_shape(stack)
        variant = DistanceVariant.coerce(self.variant)
        grid = self._grid(stack.shape[1:])
        out = np.stack([
            distance_map(image_to_edgeset(img, grid), variant.sgraph, grid, self.vacuous, self.max_iter).values
            for img in stack
        ])
        return _restore(out, was_2d)
