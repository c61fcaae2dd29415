import sys
from typing import List, TextIO, Union

from dynrank.core.graph.io import PathType
from dynrank.core.graph.snapshot import BatchUpdate

INSERTION_MARK = '+'
DELETION_MARK = '-'


class BatchParseError(ValueError):
    """ Raised on a malformed line of a batch file """

    def __init__(self, path: str, line_number: int, line: str):
        self.path = path
        self.line_number = line_number
        super().__init__(f'{path}:{line_number}: expected "+ u v" or "- u v", got {line.strip()!r}')


def write_batch(batch: BatchUpdate, stream: TextIO):
    for u, v in batch.deletions.tolist():
        stream.write(f'{DELETION_MARK} {u} {v}\n')
    for u, v in batch.insertions.tolist():
        stream.write(f'{INSERTION_MARK} {u} {v}\n')


def save_batch(batch: BatchUpdate, path: Union[PathType, None] = None):
    """ Writes deletions as ``- u v`` lines followed by insertions as ``+ u v`` lines.
    Without ``path`` the batch goes to the standard output. """
    if path is None:
        write_batch(batch, sys.stdout)
        return
    with open(path, 'wt', encoding='utf-8') as file:
        write_batch(batch, file)


def load_batch(path: PathType) -> BatchUpdate:
    """ Reads a batch file; empty lines and ``#`` comments are skipped """
    deletions: List[tuple] = []
    insertions: List[tuple] = []
    with open(path, 'rt', encoding='utf-8') as file:
        for line_number, line in enumerate(file, start=1):
            tokens = line.split()
            if not tokens or tokens[0].startswith('#'):
                continue
            if len(tokens) != 3 or tokens[0] not in (INSERTION_MARK, DELETION_MARK):
                raise BatchParseError(str(path), line_number, line)
            try:
                edge = (int(tokens[1]), int(tokens[2]))
            except ValueError:
                raise BatchParseError(str(path), line_number, line)
            (insertions if tokens[0] == INSERTION_MARK else deletions).append(edge)
    return BatchUpdate.from_pairs(deletions=deletions, insertions=insertions)
