"""Exact-arithmetic curved Lie algebra toolkit."""

from .graded import (
    Element,
    GradedSpace,
    LinearMap,
    Subspace,
    compose_maps,
    dualize,
    kernel,
    koszul_sign,
    suspend,
    tensor_elements,
    tensor_maps,
    tensor_spaces,
)
from .freelie import FreeLieTruncation, LieMonomial, build_truncation

__all__ = [
    "Element",
    "GradedSpace",
    "LinearMap",
    "Subspace",
    "compose_maps",
    "dualize",
    "kernel",
    "koszul_sign",
    "suspend",
    "tensor_elements",
    "tensor_maps",
    "tensor_spaces",
    "FreeLieTruncation",
    "LieMonomial",
    "build_truncation",
]
