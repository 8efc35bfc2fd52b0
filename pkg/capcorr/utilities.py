# -*- coding: utf-8 -*-
import json
import os
from hashlib import sha256
from typing import Any, BinaryIO, Dict, TextIO, Union

from capcorr import exceptions


def get_file_sha256_hash(fh: Union[BinaryIO, TextIO]) -> str:
    """Given a file-like object return the sha256 hash of that object
    Args:
        fh: file handle (file like object)
    Returns:
         the sha256 hash of the file
    """

    block_size = 65536
    hasher = sha256()
    buf = fh.read(block_size)
    while len(buf) > 0:
        if isinstance(buf, str):
            buf = buf.encode('utf-8')
        hasher.update(buf)
        buf = fh.read(block_size)
    return hasher.hexdigest()


def get_filepath_sha256_hash(file_path: str) -> str:
    """Given a file-path to return the sha256 hash of that file
    Args:
        file_path: path to the file being hashed
    Returns:
         the sha256 hash of a file
    """
    with open_input_file(file_path, 'rb') as afile:
        return get_file_sha256_hash(afile)


def makedirs(path: str, exist_ok: bool = True) -> None:
    """Create directory(ies) at a given path
    Args:
        path: The path to the directories
        exist_ok: If it exists, create anyway (Default value = True)
    Returns:
        None
    """
    if exist_ok:
        os.makedirs(path, exist_ok=True)
    else:
        os.makedirs(path)


def open_input_file(path: str, mode: str = 'rb'):
    """Open an input file, converting missing or unreadable paths into an `InputError` that names the path
    Args:
        path: The path to the input file
        mode: The file mode
    Returns:
        An open file object
    """
    if not path:
        raise exceptions.InputError('an input path is required but none was given')
    try:
        if 'b' in mode:
            return open(path, mode)
        return open(path, mode, encoding='utf-8')
    except FileNotFoundError:
        raise exceptions.InputError(f'{path} does not exist')
    except IsADirectoryError:
        raise exceptions.InputError(f'{path} is a directory, expected a file')
    except PermissionError:
        raise exceptions.InputError(f'{path} is not readable')


def dumps_json(data: Any) -> str:
    """Serialize data to canonical JSON; keys sorted, floats at full precision
    Args:
        data: A JSON serializable object
    Returns:
        The JSON document terminated by a newline
    """
    return json.dumps(data, indent=2, sort_keys=True, allow_nan=False) + '\n'


def write_text_file(path: str, content: str) -> None:
    """Write a text file, creating parent directories as needed
    Args:
        path: The destination path
        content: The text to write
    Returns:
        None
    """
    parent = os.path.dirname(path)
    try:
        if parent:
            makedirs(parent, exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as out_f:
            out_f.write(content)
    except OSError as e:
        raise exceptions.WriteReportError(f'{path}; {e}')


def load_json_file(path: str) -> Dict:
    """Load a JSON document from disk
    Args:
        path: The path to the JSON file
    Returns:
        The decoded document
    """
    with open_input_file(path, 'r') as json_f:
        try:
            return json.load(json_f)
        except ValueError as e:
            raise exceptions.InputError(f'{path} is not valid JSON; {e}')
