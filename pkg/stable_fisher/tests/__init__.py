"""Test suite for stable-fisher."""
