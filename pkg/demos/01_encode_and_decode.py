"""
Encode five Diracs with an IF-TEM and recover them from 16 firing times.
"""
import numpy as np

from iftem.encoder import design_params, encode, check_rate
from iftem.kernel import SosKernel, filter_signal
from iftem.model import FriSignal, PulseShape, DIRAC
from iftem.recovery import algorithm1

T, K, L = 1.0, 5, 5
sig = FriSignal(T, [0.62, -0.35, 0.91, -0.78, 0.27], [0.10, 0.25, 0.45, 0.70, 0.85])

# sum-of-sincs kernel keeps harmonics 1..K; the filtered signal is a trig polynomial
f = filter_signal(sig, SosKernel.for_period(K, T))
p = design_params(f.bound_c, K, T, bias_factor=4.0, margin=1.05)
print("bound c =", round(f.bound_c, 4), " b =", round(p.bias_b, 4), " delta =", round(p.delta, 5))
print("rate condition (ok, margin):", check_rate(p, f.bound_c, K, T))

trace = encode(f, p)
print(len(trace), "firings:", np.round(trace.times, 4))

# delays are on a 0.05 grid, so K = L harmonics suffice with a grid search
grid = np.arange(1, 21) * 0.05
res = algorithm1(trace, K, L, PulseShape(DIRAC), T, grid=grid)
print("delays     ", res.delays)
print("amplitudes ", np.round(res.amplitudes, 6))

# off the grid we need K >= 2L and an annihilating filter
K2 = 2 * L
f2 = filter_signal(sig, SosKernel.for_period(K2, T))
tr2 = encode(f2, design_params(f2.bound_c, K2, T, 4.0, margin=1.05))
res2 = algorithm1(tr2, K2, L, PulseShape(DIRAC), T)
print(len(tr2), "firings, max delay error", np.abs(res2.delays - np.sort(sig.delays)).max())
