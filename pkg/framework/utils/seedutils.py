#!/usr/bin/env python
"""Utility functions for deriving independent random streams."""
import zlib
import numpy as np


def stream_key(master_seed, component, *indices):
    """Build the entropy key of a named random stream.

    Parameters
    ----------
    master_seed: int, required
        The master seed of the run.
    component: str, required
        The name of the component consuming the stream.
    indices: int, optional
        Additional integers identifying the stream within the component.

    Returns
    -------
    key: list of int
        The entropy passed to `numpy.random.SeedSequence`.
    """
    key = [int(master_seed) & 0xFFFFFFFF, zlib.crc32(component.encode('utf8'))]
    key.extend(int(index) & 0xFFFFFFFF for index in indices)
    return key


def derive_rng(master_seed, component, *indices):
    """Create a random generator for a named stream.

    The same (master seed, component, indices) always yields the same stream,
    regardless of the order in which streams are requested.

    Parameters
    ----------
    master_seed: int, required
        The master seed of the run.
    component: str, required
        The name of the component consuming the stream.
    indices: int, optional
        Additional integers identifying the stream within the component.

    Returns
    -------
    rng: numpy.random.Generator
        The generator of the stream.
    """
    sequence = np.random.SeedSequence(
        stream_key(master_seed, component, *indices))
    return np.random.default_rng(sequence)


def derive_seed(master_seed, component, *indices):
    """Derive an integer seed for a named stream.

    Parameters
    ----------
    master_seed: int, required
        The master seed of the run.
    component: str, required
        The name of the component consuming the seed.
    indices: int, optional
        Additional integers identifying the stream within the component.

    Returns
    -------
    seed: int
        A non-negative 31-bit seed.
    """
    sequence = np.random.SeedSequence(
        stream_key(master_seed, component, *indices))
    return int(sequence.generate_state(1, dtype=np.uint32)[0] >> 1)
