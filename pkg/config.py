"""Server configuration."""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Server settings
HOST = os.getenv('SERVER_HOST', '127.0.0.1')
PORT = int(os.getenv('SERVER_PORT', '5000'))
DEBUG = os.getenv('SERVER_DEBUG', '0') == '1'

# Request limits
MAX_CONTENT_LENGTH = int(os.getenv('MAX_CONTENT_LENGTH', str(2 * 1024 * 1024)))
