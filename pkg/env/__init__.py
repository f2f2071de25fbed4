# Simulated CV modes: grids, Gaussian gates, Zak transform, ancilla circuits
