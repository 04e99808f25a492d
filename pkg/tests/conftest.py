import random

from txcleanse import TransactionDatabase, database_from_items


def letters_db(*strings: str) -> TransactionDatabase:
    """Build a database of single-letter items, one transaction per string."""
    return database_from_items([list(s) for s in strings])


def random_db(rng: random.Random, max_tx: int = 40, max_vocab: int = 30,
              max_size: int = 6) -> TransactionDatabase:
    """Small random database; every transaction non-empty."""
    n = rng.randint(1, max_tx)
    vocab = rng.randint(1, max_vocab)
    return database_from_items(
        [[f"i{rng.randrange(vocab)}" for _ in range(rng.randint(1, max_size))]
         for _ in range(n)]
    )
