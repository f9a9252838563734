"""
Integrate-and-fire time encoding of periodic FRI signals and their recovery
from firing times below the Nyquist rate.
"""

from .errors import *  # noqa: F401,F403
from .model import PulseShape, FriSignal, fsc, fsc_vector, eval_signal
from .kernel import (SosKernel, FilteredSignal, filter_signal, eval_y, antiderivative_Y,
                     amplitude_bound)
from .encoder import (TemParams, FiringTrace, encode, measurements, add_jitter,
                      check_rate, design_params)
from .recovery import (build_forward, partial_sums, solve_fsc_baseline, solve_fsc_robust,
                       variance_ratio_check, decode, estimate_delays, algorithm1,
                       RecoveryResult)
from .spectral import (annihilating_filter, cadzow, roots_to_delays, estimate_amplitudes,
                       grid_search, mse_delays)

__version__ = "0.1.0"
