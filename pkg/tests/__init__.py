"""FSS Toolkit test suite."""
