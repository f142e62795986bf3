"""Clustering benchmark engine: conventional algorithms behind one contract,
seeded hyperparameter sweeps, performance-matrix low-rank analysis and
completion, meta-features, and meta-learned model selection."""

try:
    from ._clubench import *  # noqa: F401,F403  (installed wheel layout)
    from ._clubench import __version__  # noqa: F401
except ImportError:  # build-tree layout: extension sits next to the package
    from _clubench import *  # noqa: F401,F403
    from _clubench import __version__  # noqa: F401
