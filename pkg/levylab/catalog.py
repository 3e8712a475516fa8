"""Built-in models, kept as model-file text so they go through the same parser as user files."""

from __future__ import annotations

from levylab.parser import ModelFile, parse_model

CATALOG: dict[str, str] = {
    "brownian1d": """
name = brownian1d
dimension = 1
covariance = (1)
""",
    "brownian2d": """
name = brownian2d
dimension = 2
covariance = (1, 0; 0, 1)
""",
    "drift1d": """
name = drift1d
dimension = 1
drift = (1)
""",
    "drift2d": """
name = drift2d
dimension = 2
drift = (1, 0)
""",
    "poisson1d": """
name = poisson1d
dimension = 1
atom = 1 @ (1)

[grid]
period = 1
""",
    "symmetric1d": """
name = symmetric1d
dimension = 1
atom = 1 @ (1)
atom = 1 @ (-1)
""",
    "compensated1d": """
# drift cancels the small-jump compensator of the atom at 1/2
name = compensated1d
dimension = 1
drift = (-1/4)
atom = 1/2 @ (1/2)
""",
    "lattice2d": """
name = lattice2d
dimension = 2
atom = 1 @ (1, 0)
atom = 1 @ (0, 1)
""",
    "mixed2d": """
name = mixed2d
dimension = 2
covariance = (1, 0; 0, 0)
atom = 1 @ (0, 1)
""",
    "lattice3d": """
name = lattice3d
dimension = 3
atom = 1 @ (1, 0, 0)
atom = 1 @ (0, 1, 0)
atom = 1/2 @ (0, 0, 2)
""",
    "brownian_poisson1d": """
name = brownian_poisson1d
dimension = 1
covariance = (1)
atom = 1 @ (1)
""",
    "incommensurable1d": """
name = incommensurable1d
dimension = 1
atom = 1 @ (1)
atom = 1 @ (sqrt:2)
""",
    "truncation1d": """
name = truncation1d
dimension = 1
atom = 1 @ (1/2)
atom = 1 @ (2)
atom = 1 @ (5)
""",
    "stable1d": """
name = stable1d
dimension = 1

[symbol]
family = stable
alpha = 1/2
""",
    "sqrt_poisson1d": """
name = sqrt_poisson1d
dimension = 1
atom = 1 @ (1)

[bernstein]
family = power
parameter = 1/2
""",
}


def catalog_names() -> list[str]:
    return sorted(CATALOG)


def catalog_text(name: str) -> str:
    try:
        return CATALOG[name].lstrip("\n")
    except KeyError:
        raise ValueError(f"unknown catalog model {name!r}; known: {', '.join(catalog_names())}") from None


def catalog_model(name: str) -> ModelFile:
    return parse_model(catalog_text(name), source=f"catalog:{name}")
