"""Tests para plumbr."""
