"""Canonical density specifications used by the tests and the README.

Each function returns a plain dictionary in the density-file layout;
shapes are unnormalized and the builder rescales them to unit mass.
"""

from __future__ import annotations

__all__ = [
    "uniform",
    "tent",
    "even_zero",
    "gap",
    "inverse_sqrt",
    "zero_with_singularity",
]


def uniform() -> dict:
    """Flat density on (0, 1)."""
    return {
        "name": "uniform",
        "pieces": [{"interval": [0.0, 1.0],
                    "form": {"kind": "constant", "value": 1.0}}],
    }


def tent() -> dict:
    """4|x - 1/2|: one order-1 zero at the midpoint."""
    return {
        "name": "tent",
        "pieces": [{"interval": [0.0, 1.0],
                    "form": {"kind": "power", "coefficient": 4.0,
                             "center": 0.5, "exponent": 1.0}}],
        "zeros": [{"location": 0.5, "order": 1, "lower_coeff": 4.0,
                   "upper_coeff": 4.0, "radius": 0.25}],
    }


def even_zero(order: int = 2, radius: float = 0.25) -> dict:
    """|x - 1/2|**order: a single zero of the given order at the midpoint."""
    return {
        "name": f"zero-k{order}",
        "pieces": [{"interval": [0.0, 1.0],
                    "form": {"kind": "power", "coefficient": 1.0,
                             "center": 0.5, "exponent": float(order)}}],
        "zeros": [{"location": 0.5, "order": order, "lower_coeff": 1.0,
                   "upper_coeff": 1.0, "radius": radius}],
    }


def gap() -> dict:
    """3/2 on the outer thirds, 0 on the middle third: non-convergent."""
    third = 1.0 / 3.0
    return {
        "name": "gap",
        "pieces": [
            {"interval": [0.0, third],
             "form": {"kind": "constant", "value": 1.5}},
            {"interval": [third, 2.0 * third],
             "form": {"kind": "constant", "value": 0.0}},
            {"interval": [2.0 * third, 1.0],
             "form": {"kind": "constant", "value": 1.5}},
        ],
    }


def inverse_sqrt() -> dict:
    """x**(-1/2): unbounded at 0, bounded below, no zero."""
    return {
        "name": "inverse-sqrt",
        "pieces": [{"interval": [0.0, 1.0],
                    "form": {"kind": "power", "coefficient": 1.0,
                             "center": 0.0, "exponent": -0.5}}],
        "singulars": [{"location": 0.0, "exponent": -0.5, "coefficient": 1.0}],
    }


def zero_with_singularity() -> dict:
    """One order-1 zero at 1/2 plus an integrable blow-up at 0.

    Shape: x**(-1/2) on (0, 1/4), 8|x - 1/2| on (1/4, 3/4), 2 on (3/4, 1);
    continuous at the joins and with total raw mass 2.
    """
    return {
        "name": "zero-plus-singularity",
        "pieces": [
            {"interval": [0.0, 0.25],
             "form": {"kind": "power", "coefficient": 1.0,
                      "center": 0.0, "exponent": -0.5}},
            {"interval": [0.25, 0.75],
             "form": {"kind": "power", "coefficient": 8.0,
                      "center": 0.5, "exponent": 1.0}},
            {"interval": [0.75, 1.0],
             "form": {"kind": "constant", "value": 2.0}},
        ],
        "zeros": [{"location": 0.5, "order": 1, "lower_coeff": 8.0,
                   "upper_coeff": 8.0, "radius": 0.25}],
        "singulars": [{"location": 0.0, "exponent": -0.5, "coefficient": 1.0}],
    }
