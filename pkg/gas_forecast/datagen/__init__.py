from .driver import (
    GeneratorConfig,
    demand_noise,
    generate,
    generate_frame,
    noise_weights,
    seasonal_temperature,
    simulate_temperature,
)
