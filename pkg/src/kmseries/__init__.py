"""kmseries: closed-form series approximation of derivative prices.

The package expands the pricing operator of a continuous-time model around a
tractable baseline (Black-Scholes for equity options, a Gaussian futures
curve for commodities) and sums symbolic corrective terms in powers of time
to maturity.  Reference solvers (Fourier inversion and Monte Carlo) and
diagnostics ship alongside so every approximation can be checked in place.

Subpackages
-----------
symx         minimal symbolic kernel (build, differentiate, evaluate)
models       model catalog: drift/covariance coefficient tables
expansion    corrective-term recursion, prices, greeks, nuisance tuning
closedform   Black-Scholes and Gaussian futures formulas (numeric + symbolic)
fourier      characteristic-function pricing with branch-corrected logs
mc           Monte Carlo reference schemes with deterministic seeding
diagnostics  boundary/stationarity checks and error metrics
cli          command line front end (also ``python -m kmseries.cli``)
"""

from . import symx
from .backend import available_backends, backend_name

__version__ = "0.1.0"

__all__ = ["symx", "backend_name", "available_backends", "__version__"]
