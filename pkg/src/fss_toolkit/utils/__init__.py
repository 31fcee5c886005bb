"""Utility modules for FSS Toolkit."""
