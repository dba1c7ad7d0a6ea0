from udd_lab.services.sequence_service import udd_sequence, switching_function, q_factor
from udd_lab.services.bounds_service import delta_bound, distance_bound, delta_bound_fixed_interval
from udd_lab.services.simulator_service import random_bath, toggling_propagator, verify_bound
from udd_lab.services.dyson_service import f_alpha_exact, verify_vanishing_orders

# This lets you import the main operations directly:
# from udd_lab import udd_sequence, delta_bound, verify_bound
