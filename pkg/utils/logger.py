import json
import logging
import os
from datetime import datetime


def setup_logger(name: str) -> logging.Logger:
    logger = logging.getLogger(name)
    # already configured by an earlier call
    if logger.handlers:
        return logger

    # load level from settings
    try:
        with open('config/settings.json', 'r', encoding='utf-8') as f:
            log_level = json.load(f).get('log_level', 'INFO')
    except (OSError, ValueError):
        log_level = 'INFO'  # missing or unreadable settings file

    logger.setLevel(getattr(logging, str(log_level).upper(), logging.INFO))
    logger.propagate = False

    os.makedirs('logs', exist_ok=True)
    log_filename = f"logs/hetnet_{datetime.now().strftime('%d%m%Y')}.log"

    formatter = logging.Formatter('%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    file_handler = logging.FileHandler(log_filename, encoding='utf-8')
    file_handler.setFormatter(formatter)

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(formatter)

    logger.addHandler(file_handler)
    logger.addHandler(console_handler)

    return logger
