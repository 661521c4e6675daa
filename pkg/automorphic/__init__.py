# Numerical engine for regularized integrals on PGL2 over Q
