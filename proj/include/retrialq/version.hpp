#pragma once

#define RETRIALQ_VERSION "0.1.0"
