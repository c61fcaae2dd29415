import os
import platform
import tempfile
from pathlib import Path


def default_data_dir() -> str:
    """ Folder for logs and worker log files, ``DYNRANK`` in the system temporary directory """
    temp_folder = Path('/tmp' if platform.system() == 'Darwin' else tempfile.gettempdir())
    data_dir = os.path.join(temp_folder, 'DYNRANK')
    os.makedirs(data_dir, exist_ok=True)
    return data_dir
