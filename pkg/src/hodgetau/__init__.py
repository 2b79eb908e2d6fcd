"""Square-tiled surfaces, Lyapunov sums, Hodge-class relations and tau functions of abelian differentials."""

__version__ = "0.1.0"

REPORT_SCHEMA = "hodgetau-report/1"
