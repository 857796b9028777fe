"""Clark measures of rational inner functions on the bidisk and tridisk.

Submodules are imported lazily so the command-line entry point can cap
BLAS thread pools (RIFCLARK_THREADS) before numpy is first loaded.
"""

from importlib import import_module

__version__ = "0.1.0"

_SUBMODULES = ("blaschke", "catalog", "clark", "cli", "contact", "embedding",
               "errors", "levelset", "poly", "polydisk", "util")

__all__ = list(_SUBMODULES) + ["__version__"]


def __getattr__(name):
    if name in _SUBMODULES:
        module = import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(__all__)
