"""Delta-shock formation in the 1D pressureless Euler-Poisson system.

Simulation of cold-ion plasma blow-up along characteristics, transformation
to the modulated self-similar frame, blow-up rate fitting, and numerical
verification of the supporting profile/transport inequalities.
"""

__version__ = "0.1.0"
