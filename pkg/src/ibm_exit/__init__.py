"""Exit-time tails of iterated Brownian motion and Brownian-time Brownian motion.

All eigenvalues refer to the generator Laplacian / 2.  Probabilities are
returned as natural logarithms unless a function name says otherwise.
"""

from .compose import QuadConfig, SurvivalCurve, btbm_tail, compare_tails, ibm_tail, moment_compare, xi_clock_tail
from .interval_exit import EtaQuery, eta_survival, eta_survival_unit, eta_symmetric_derivative
from .spectral import Disk, Interval, Rectangle, SpectralBasis, build_basis, parse_domain, tau_density, tau_survival

__version__ = "0.1.0"
