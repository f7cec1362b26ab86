"""Killing tensors, Nijenhuis torsion, and integrability conditions."""

try:
    from ._kintegra import (
        Field,
        Space,
        __version__,
        expression_field,
        field_from_text,
        generator_names,
        independence_witness,
        killing_basis,
        metric_field,
        nullspace_dims,
        verify_redundancy,
    )
except ImportError:  # build tree: the extension sits next to the package
    from _kintegra import (
        Field,
        Space,
        __version__,
        expression_field,
        field_from_text,
        generator_names,
        independence_witness,
        killing_basis,
        metric_field,
        nullspace_dims,
        verify_redundancy,
    )

__all__ = [
    "Field",
    "Space",
    "__version__",
    "expression_field",
    "field_from_text",
    "generator_names",
    "independence_witness",
    "killing_basis",
    "metric_field",
    "nullspace_dims",
    "verify_redundancy",
]
