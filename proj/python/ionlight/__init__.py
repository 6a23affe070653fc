"""Gaussian-beam ion addressing: rotation angles, thermal gate fidelities,
Rabi calibration, heating-rate fits, and scenario runners.

The compiled extension lives inside the package for installed builds and on
``PYTHONPATH`` (next to this package) for in-tree CMake builds.
"""

try:
    from ._ionlight import *  # noqa: F401,F403
    from ._ionlight import __version__, constants  # noqa: F401
except ImportError:  # pragma: no cover - CMake build-tree layout
    from _ionlight import *  # noqa: F401,F403
    from _ionlight import __version__, constants  # noqa: F401
