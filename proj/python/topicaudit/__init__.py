"""Topic-bias audit toolkit: text prep, online LDA, coherence, eval harness."""

try:
    from ._core import *  # noqa: F401,F403  (installed package layout)
except ImportError:  # build-tree layout: _core.so sits next to this dir on sys.path
    from _core import *  # noqa: F401,F403

__version__ = "0.1.0"
