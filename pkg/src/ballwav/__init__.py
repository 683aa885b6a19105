"""Exact harmonic transforms and axisymmetric wavelets on the solid 3-ball.

Submodules are imported lazily so that the command-line entry point can pin
thread-count environment variables before numpy is first loaded.
"""

__version__ = "0.1.0"

_SUBMODULES = (
    "laguerre",
    "sht",
    "flag",
    "tiling",
    "flaglet",
    "denoise",
    "ballfile",
    "cli",
)


def __getattr__(name):
    if name in _SUBMODULES:
        import importlib

        module = importlib.import_module(f".{name}", __name__)
        globals()[name] = module
        return module
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(list(globals()) + list(_SUBMODULES))
