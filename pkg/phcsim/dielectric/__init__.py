"""Frequency dependent permittivity models."""

from ._models import (
    DEFAULT_POLE_GUARD as DEFAULT_POLE_GUARD,
    MODEL_CLASSES as MODEL_CLASSES,
    Constant as Constant,
    DielectricModel as DielectricModel,
    DiskLike as DiskLike,
    DrudeLossless as DrudeLossless,
    DrudeLossy as DrudeLossy,
    Lorentz as Lorentz,
    ModelKind as ModelKind,
    build_model as build_model,
    lorentz_from_frequencies as lorentz_from_frequencies,
    region_is_holomorphic as region_is_holomorphic,
)
