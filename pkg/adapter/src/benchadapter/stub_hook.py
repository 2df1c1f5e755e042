"""Example live-mode hook. A real one would build the requested model on the
requested framework, apply the compression, then time single-frame inference
and measure accuracy on the target device."""


def benchmark(combination, input_size):
    return 0.5, 1.0
