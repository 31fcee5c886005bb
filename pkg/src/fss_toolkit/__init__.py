"""FSS Toolkit: Fréchet means, finite sample smeariness and mean tests on circles and spheres."""

__version__ = "0.1.0"
