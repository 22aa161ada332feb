"""Pass/fail thresholds shared by the scenario drivers, the CLI summaries and the tests."""

GREEN_TOL = 1e-10          # absolute accuracy target of one Green-function value
PSI_TOL = 2 * GREEN_TOL    # transformed eigenfunctions vs closed forms, relative to max(1, scale)
CREATION_B_TOL = 1e-10     # transformed dbar-data vs point-potential data, relative to max|B|
ANNIHILATION_B_TOL = 1e-12
MIN_ORDER = 1.9            # observed finite-difference convergence order
SYMMETRY_TOL = 1e-13
CONSISTENCY_TOL = 1e-13
OMEGA_IMAG_TOL = 1e-10
OMEGA_INCREMENT_TOL = 1e-6
POLE_ORDER_RANGE = (0.9, 1.1)
FD_STEPS = (1e-2, 5e-3, 2.5e-3)
