"""powergan: synthesize labeled appliance power traces with a conditional,
progressively growing 1-D Wasserstein GAN, and score the results."""

__version__ = "0.1.0"
