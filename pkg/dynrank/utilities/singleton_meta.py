from threading import RLock


class SingletonMeta(type):
    """
    Provides classes with the Singleton pattern: one instance per class per process.
    Pass it to the metaclass parameter when defining your class as follows:

    class YourClassName(metaclass=SingletonMeta)
    """
    _instances = {}
    _lock: RLock = RLock()

    def __call__(cls, *args, **kwargs):
        with cls._lock:
            if cls not in cls._instances:
                cls._instances[cls] = super().__call__(*args, **kwargs)
        return cls._instances[cls]

    def forget(cls):
        """ Drops the stored instance so that the next call constructs a fresh one """
        with cls._lock:
            cls._instances.pop(cls, None)
