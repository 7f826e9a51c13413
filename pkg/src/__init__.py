# Simulator package initialization
