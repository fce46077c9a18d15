"""Physical constants shared across the package."""

SPEED_OF_LIGHT = 299792458.0  # m/s, exact
BOLTZMANN = 1.380649e-23      # J/K, exact
T0_KELVIN = 290.0             # standard noise reference temperature
