"""Make fixtures package importable."""

from .loader import (
    BUILTINS,
    dump_system,
    load_bundle,
    load_complex,
    load_contraction,
    load_file,
    load_hom,
    load_inner_product,
    load_isotopy,
    load_system,
    read_json,
)

__all__ = [
    "BUILTINS",
    "dump_system",
    "load_bundle",
    "load_complex",
    "load_contraction",
    "load_file",
    "load_hom",
    "load_inner_product",
    "load_isotopy",
    "load_system",
    "read_json",
]
