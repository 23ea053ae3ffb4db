import os
import tempfile


def data_file(*parts):
    """Path of a real dataset file under `PYNBHD_DATA_DIR`, or `None` when it is not available."""
    root = os.environ.get('PYNBHD_DATA_DIR')
    if root is None:
        return None
    path = os.path.join(root, *parts)
    return path if os.path.isfile(path) else None


def write_rows(rows, suffix='.csv'):
    """Write `rows` (a list of lines) into a temporary file and return its path."""
    handle, path = tempfile.mkstemp(suffix=suffix)
    with os.fdopen(handle, 'w', encoding='utf-8') as f:
        f.write(''.join(row + '\n' for row in rows))
    return path
