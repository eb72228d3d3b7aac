"""boris-gc tests."""
