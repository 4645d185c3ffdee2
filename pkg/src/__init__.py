# Kinetic Benchmark Suite Package
