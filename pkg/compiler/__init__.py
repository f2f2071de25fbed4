# Circuit compiler: text IR to exact and ancilla-driven schedules
