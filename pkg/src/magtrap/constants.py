"""Physical constants and shared defaults.

Values are CODATA-style SI. Material defaults correspond to a sintered
NdFeB-class hard magnet: remanence-level saturation field of 1 T and mass
density 7000 kg/m^3. Conductor defaults (copper conductivity) feed the
induced-moment and eddy-loss budgets.
"""

import math

MU0 = 4e-7 * math.pi            # vacuum permeability [T m / A]
G_EARTH = 9.8                   # gravitational acceleration [m/s^2]

# hard-magnet material defaults
B_SAT = 1.0                     # saturation/remanence field mu0*M [T]
RHO_MAGNET = 7.0e3              # mass density [kg/m^3]

# conductor defaults (copper, for chip-wire budgets)
SIGMA_CU = 4.4e7                # electrical conductivity [S/m]

# practical DC current-density guideline for lithographic wires [A/cm^2]
J_WIRE_LIMIT = 1.0e5
