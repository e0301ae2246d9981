import os


class DirectoryInfo(object):
    file_path = __file__
    utils_dir = os.path.dirname(file_path)
    src_dir = os.path.dirname(utils_dir)
    project_dir = os.path.dirname(src_dir)

    @classmethod
    def get_project_dir(cls):
        return cls.project_dir

    @classmethod
    def resolve_path(cls, path: str) -> str:
        """Absolute paths pass through; relative ones resolve against cwd if present there, else the project."""
        if os.path.isabs(path):
            return path
        if os.path.exists(path):
            return os.path.abspath(path)
        return os.path.join(cls.project_dir, path)
