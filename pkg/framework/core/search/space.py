"""Categorical encodings of the architectures of a tabular benchmark."""
from typing import List, Optional, Sequence, Tuple
import numpy as np
from framework.core.curves import ArchitectureRecord
from framework.core.curves import BenchmarkDataset
from framework.errors import InvalidInputError

ABSENT = -1


def mutate_encoding(encoding: Sequence[int], position: int, choices: int,
                    rng) -> Tuple[int, ...]:
    """Change one position of an encoding to a different value, uniformly.

    Parameters
    ----------
    encoding: sequence of int, required
        The parent encoding.
    position: int, required
        The position to change.
    choices: int, required
        The number of values the position can take (0..choices-1); at least 2.
    rng: numpy.random.Generator, required
        The random generator.

    Returns
    -------
    child: tuple of int
        The encoding differing from the parent exactly at `position`.
    """
    if choices < 2:
        raise InvalidInputError(
            "position {} has a single choice and cannot mutate".format(position))
    current = encoding[position]
    value = int(rng.integers(choices - 1))
    if value >= current:
        value += 1
    child = list(encoding)
    child[position] = value
    return tuple(child)


class SearchSpace:
    """The space of encodings spanned by the records of a benchmark.

    Encodings shorter than the longest one are padded with `ABSENT`, which
    lets variable-depth spaces share one per-position categorical domain.
    """

    def __init__(self, bench: BenchmarkDataset):
        """Create the space of a benchmark.

        Parameters
        ----------
        bench: BenchmarkDataset, required
            The benchmark; every record must have a distinct encoding.
        """
        self.bench = bench
        self.length = max(len(r.encoding) for r in bench)
        if self.length == 0:
            raise InvalidInputError("benchmark records have empty encodings")
        self.__records = {}
        for record in bench:
            key = self.pad(record.encoding)
            if key in self.__records:
                raise InvalidInputError(
                    "records {} and {} share the encoding {}".format(
                        self.__records[key].arch_id, record.arch_id,
                        list(record.encoding)))
            self.__records[key] = record
        self.domains = [
            tuple(sorted({key[p]
                          for key in self.__records}))
            for p in range(self.length)
        ]

    def __len__(self):
        return len(self.__records)

    def pad(self, encoding: Sequence[int]) -> Tuple[int, ...]:
        """Pad an encoding to the length of the space."""
        encoding = tuple(int(e) for e in encoding)
        return encoding + (ABSENT, ) * (self.length - len(encoding))

    def lookup(self, padded: Sequence[int]) -> Optional[ArchitectureRecord]:
        """Get the record of a padded encoding, if the benchmark has one."""
        return self.__records.get(tuple(int(e) for e in padded))

    def neighbors(self, record: ArchitectureRecord) -> List[ArchitectureRecord]:
        """Get the records whose encodings differ from `record` at exactly one position.

        Returns
        -------
        neighbors: list of ArchitectureRecord
            The neighbors, ordered by position then by value.
        """
        parent = self.pad(record.encoding)
        result = []
        for position, domain in enumerate(self.domains):
            for value in domain:
                if value == parent[position]:
                    continue
                child = list(parent)
                child[position] = value
                neighbor = self.lookup(child)
                if neighbor is not None:
                    result.append(neighbor)
        return result

    def random_record(self, rng) -> ArchitectureRecord:
        """Draw a record uniformly at random."""
        return self.bench.records[int(rng.integers(len(self.bench)))]

    def position_index(self, position: int, value: int) -> int:
        """Get the index of a value in the domain of a position."""
        return self.domains[position].index(value)

    def value_counts(self, encodings: Sequence[Sequence[int]]) -> List[np.ndarray]:
        """Count the values taken at every position by a set of padded encodings."""
        counts = [np.zeros(len(domain)) for domain in self.domains]
        for encoding in encodings:
            for position, value in enumerate(encoding):
                counts[position][self.position_index(position, value)] += 1
        return counts
