"""The installed version of the ``dunnett-ctp`` distribution."""

from importlib.metadata import PackageNotFoundError, version

__all__ = ["__version__"]

try:
    __version__ = version("dunnett-ctp")
except PackageNotFoundError:
    # Running from a source tree without an install
    __version__ = "unknown"
