"""Suite-calibrated constants frozen as golden baselines.

The asymptotic guarantees only promise positive constants; these are the
values measured on the standing suite instances (with margin), recorded so
regressions are visible.
"""

# grid-average marked-projection mass times log2(T) on gadget instances
# (measured 0.097..0.114 across the suite)
KAPPA_GRID = 0.09

# single-shot marked-measurement probability of the simpler algorithm times
# log2(T) (measured 0.32..1.01 across the suite)
KAPPA_SINGLE_SHOT = 0.25

# hitting time of the t-step chain times pi(m) at t = ceil(pi(m) HT), unique
# marked vertex (measured 0.63..1.47 across the suite)
TSTEP_SINGLE_MARK_C = 2.0
