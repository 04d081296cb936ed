"""jacsplit: explicit split multiplications on hyperelliptic Jacobians.

The package constructs pairs of hyperelliptic curves whose Jacobians are
linked by an explicit correspondence, computes the induced action on
differentials, the multiplication integer m with phi_hat o phi = [m], kernel
structures at specialized parameters, and absolute-simplicity certificates
for the associated Weil polynomials.
"""

__version__ = "0.1.0"
