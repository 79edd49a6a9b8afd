"""Python bindings for the runlab core."""

import json
from fractions import Fraction
from pkgutil import extend_path

# lets a build-tree copy of the extension sit next to the source package
__path__ = extend_path(__path__, __name__)

from ._runlab import (  # noqa: E402
    RunlabError,
    __version__,
    count_no_run as _count_no_run,
    cylinder_count as _cylinder_count,
    construct_report as _construct_report,
    deviation_probability as _deviation_probability,
    ep_prefix,
    exact_run_cdf as _exact_run_cdf,
    monte_carlo,
    run_cli,
    run_length,
)


def _frac(parts):
    return Fraction(int(parts[0]), int(parts[1]))


def cylinder_count(p, level):
    return int(_cylinder_count(p, level))


def count_no_run(n, k):
    return int(_count_no_run(n, k))


def exact_run_cdf(n, k):
    """P(r_n < k) for a uniformly random word of length n."""
    return _frac(_exact_run_cdf(n, k))


def deviation_probability(n, epsilon):
    """P(|r_n / log2 n - 1| > epsilon), exactly."""
    return _frac(_deviation_probability(n, str(Fraction(epsilon))))


def construct_report(phi="log2", p=3, count=6, mode="relaxed"):
    return json.loads(_construct_report(phi, p, count, mode))


__all__ = [
    "RunlabError",
    "__version__",
    "construct_report",
    "count_no_run",
    "cylinder_count",
    "deviation_probability",
    "ep_prefix",
    "exact_run_cdf",
    "monte_carlo",
    "run_cli",
    "run_length",
]
