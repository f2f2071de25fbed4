# Operator utilities: Gamma-operators, encoding, dense oracle, run configuration
