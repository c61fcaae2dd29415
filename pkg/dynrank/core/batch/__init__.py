from dynrank.core.batch.batch_io import BatchParseError, load_batch, save_batch
from dynrank.core.batch.batchgen import BatchGenerationError, BatchSpec, generate_batch
