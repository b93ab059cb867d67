"""Shadow-robust road region recognition.

The heavy lifting lives in the compiled `_core` module; this package
re-exports it. In an installed wheel `_core` sits inside the package;
when working from a plain CMake build tree, put the directory holding
the built extension on `sys.path` (see tests/python/test_smoke.py).
"""

try:
    from ._core import *  # noqa: F401,F403
    from ._core import __version__  # noqa: F401
except ImportError:  # build-tree layout
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
