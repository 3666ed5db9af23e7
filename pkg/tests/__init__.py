"""Test suite for hdx-codes."""
